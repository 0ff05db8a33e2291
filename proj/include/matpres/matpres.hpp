#pragma once

/// Umbrella header: linear operators on Hermitian-matrix-coefficient
/// polynomials — canonical differential representation, atomic measure
/// constructions, positivity certification, and the log-normal lab.

#include "matpres/certify.hpp"
#include "matpres/errors.hpp"
#include "matpres/exact.hpp"
#include "matpres/hermitian.hpp"
#include "matpres/json_io.hpp"
#include "matpres/lognormal.hpp"
#include "matpres/measures.hpp"
#include "matpres/multiindex.hpp"
#include "matpres/operator.hpp"
#include "matpres/polynomial.hpp"
#include "matpres/rng.hpp"
#include "matpres/sampling.hpp"
#include "matpres/spectral.hpp"
