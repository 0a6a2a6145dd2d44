#pragma once

#include <string>
#include <string_view>

namespace siopt {

// .MEASURE reduction over a transient series.
enum class Reducer { Min, Max, Avg, Integ };

std::string_view reducer_name(Reducer r);
bool reducer_from_name(std::string_view name, Reducer& out);

} // namespace siopt
