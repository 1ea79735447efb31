#ifndef PRVA_PRVA_HPP
#define PRVA_PRVA_HPP

#include "prva/errors.hpp"
#include "prva/random.hpp"
#include "prva/math.hpp"
#include "prva/noise_source.hpp"
#include "prva/transform.hpp"
#include "prva/kernel_density.hpp"
#include "prva/samplers.hpp"
#include "prva/benchmarks.hpp"
#include "prva/evaluation.hpp"

#endif  // PRVA_PRVA_HPP
