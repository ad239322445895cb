#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

using HP = boost::multiprecision::cpp_dec_float_50;

}  // namespace oracle
