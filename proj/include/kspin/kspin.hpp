#pragma once

#include "bounds.hpp"
#include "curvature.hpp"
#include "error.hpp"
#include "exact.hpp"
#include "fiber.hpp"
#include "matrix.hpp"
#include "product.hpp"
#include "report.hpp"
#include "sphere.hpp"
#include "suites.hpp"
#include "torus.hpp"
#include "twistor.hpp"
