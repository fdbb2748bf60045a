#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace topo {

using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const BigInt& v) { return v.str(); }

}  // namespace topo
