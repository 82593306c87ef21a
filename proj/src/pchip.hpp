#pragma once

// Some Boost releases call isnan unqualified inside pchip; make it visible.
#include <cmath>
using std::isnan;

#include <boost/math/interpolators/pchip.hpp>
