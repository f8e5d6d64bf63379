#pragma once

#include "liouville/error.hpp"
#include "liouville/geometry.hpp"
#include "liouville/complex.hpp"
#include "liouville/flatness.hpp"
#include "liouville/conformal.hpp"
#include "liouville/hyperbolic.hpp"
#include "liouville/generators.hpp"
#include "liouville/io.hpp"
