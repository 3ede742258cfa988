#ifndef FQHL_FQHL_HPP
#define FQHL_FQHL_HPP

#include "fqhl/common.hpp"
#include "fqhl/prime_field.hpp"
#include "fqhl/poly.hpp"
#include "fqhl/fqpoly.hpp"
#include "fqhl/extension_field.hpp"
#include "fqhl/field.hpp"
#include "fqhl/poly_text.hpp"
#include "fqhl/bipoly.hpp"
#include "fqhl/random.hpp"
#include "fqhl/hlcount.hpp"
#include "fqhl/galois_stats.hpp"
#include "fqhl/experiment.hpp"

#endif  // FQHL_FQHL_HPP
