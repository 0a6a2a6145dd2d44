#pragma once

#include <array>
#include <string_view>

// The nine concrete HSPICE-dialect syntax blocks exercised by the deck
// corpus tests, verbatim.  (The two generic statement-form templates with
// symbolic placeholders are not parseable text and are covered by the
// structured parser tests instead.)
namespace corpus {

inline constexpr std::string_view kWindowedMeasure = R"(.PARAM eye_mask=840ps
VWIN win 0 PULSE(2 0 delay 1f 1f 'eye_mask' period)
RWIN win 0 1meg
.MEAS TRAN eye_open MIN par('abs(v(sig)-vref) + v(win)')
)";

inline constexpr std::string_view kEightParams = R"(.PARAM
+ series_r_drvr=OPT1(10, 1, 1000)
+ series_r_primary=OPT1(10, 1, 1000)
+ series_r_stub=OPT1(10, 1, 1000)
+ shunt_r_drvr=OPT1(50, 1, 1000)
+ shunt_r_primary=OPT1(50, 1, 1000)
+ shunt_r_rcvr=OPT1(50, 1, 1000)
+ z_primary=OPT1(50, 25, 100)
+ z_stub=OPT1(50, 25, 100)
)";

inline constexpr std::string_view kMaskParams = R"(.PARAM mask_rise='0.05 * bit_period'
.PARAM mask_fall='0.05 * bit_period'
.PARAM mask_high_time='0.5 * bit_period'
)";

inline constexpr std::string_view kMaskSource = R"(VMASK mask_p 0 PULSE(0 0.165 mask_delay mask_rise mask_fall
+ mask_high_time bit_period)
)";

inline constexpr std::string_view kMaskedMeasure = R"(.MEAS TRAN min_eye_opening MIN
+ par`((v(mask_p) > 0) ? (abs(v(inp,inn)) - v(mask_p)):10`)
)";

inline constexpr std::string_view kGeometry = R"(.MATERIAL nelco DIELECTRIC ER=3.7 LOSSTANGENT=0.009
.MATERIAL cu METAL CONDUCTIVITY=57.6meg
.SHAPE rect RECTANGLE WIDTH=linewidth HEIGHT=metal_thickness

.LAYERSTACK stack_1
+ LAYER=(PEC,metal_thickness),
+ LAYER=(nelco,total_dielectric_t),
+ LAYER=(PEC,metal_thickness)

.MODEL w_diffpair W
+ MODELTYPE=FIELDSOLVER,
+ LAYERSTACK=stack_1,
+ FSOPTIONS=fs_options,
+ RLGCFILE=w_diffpair.rlgc,
+ CONDUCTOR=(SHAPE=rect, ORIGIN=(0,dielectric_t), MATERIAL=cu),
+ CONDUCTOR=(SHAPE=rect, ORIGIN=(pitch, dielectric_t), MATERIAL=cu)

.PARAM linewidth=101.6um
.PARAM metal_thickness=8.89um
.PARAM dielectric_t=122um
.PARAM total_dielectric_t=`dielectric_t * 2 + metal_thickness`
.PARAM pitch=254um
)";

inline constexpr std::string_view kLinewidthOpt =
    R"(.PARAM linewidth=OPT1(101.6um, 50.8um, 127um)
)";

inline constexpr std::string_view kScaleFactor = R"(.PARAM scale_factor=`linewidth/nom_linewidth`
.PARAM pitch=`scale_factor * nom_pitch`
.PARAM dielectric_t=`scale_factor * nom_dielectric_t`
)";

inline constexpr std::string_view kMaskedMeasureRepeat = R"(.MEAS TRAN min_eye_opening MIN
+ par`((v(mask_p) > 0) ? (abs(v(inp,inn)) - v(mask_p)):10`)
)";

inline constexpr std::array<std::pair<std::string_view, std::string_view>, 9> kBlocks = {{
    {"windowed_measure", kWindowedMeasure},
    {"eight_params", kEightParams},
    {"mask_params", kMaskParams},
    {"mask_source", kMaskSource},
    {"masked_measure", kMaskedMeasure},
    {"geometry", kGeometry},
    {"linewidth_opt", kLinewidthOpt},
    {"scale_factor", kScaleFactor},
    {"masked_measure_repeat", kMaskedMeasureRepeat},
}};

// A self-contained four-stage deck in the paper's sequential-optimization
// form, with concrete values filled in.
inline constexpr std::string_view kFourStage = R"(.PARAM param_1=OPT1(0.5, 0, 1)
+ param_2=OPT2(0.5, 0, 1)
+ param_3=OPT3(0.5, 0, 1)
+ param_4=OPT4(0.5, 0, 1)

.MEAS TRAN meas1 AVG par('v(out)') GOAL=1
.MEAS TRAN meas2 MIN par('v(out)') GOAL=1e-5
.MEAS TRAN meas3 AVG par('v(out)') GOAL=1
.MEAS TRAN meas4 MIN par('v(out)') GOAL=1e-5

.MODEL model1 OPT
.MODEL model2 OPT
.MODEL model3 OPT
.MODEL model4 OPT

.TRAN 1p 10n
+ OPTIMIZE=opt1 RESULTS=meas1 MODEL=model1
.TRAN 1p 10n
+ OPTIMIZE=opt2 RESULTS=meas2 MODEL=model2
.TRAN 1p 10n
+ OPTIMIZE=opt3 RESULTS=meas3 MODEL=model3
.TRAN 1p 10n
+ OPTIMIZE=opt4 RESULTS=meas4 MODEL=model4
)";

} // namespace corpus
