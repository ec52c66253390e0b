#pragma once

// Umbrella header. json_io.hpp additionally needs nlohmann's json.hpp on the
// include path.

#include "rigidity/constructions.hpp"
#include "rigidity/corpus.hpp"
#include "rigidity/domain.hpp"
#include "rigidity/error.hpp"
#include "rigidity/flatten.hpp"
#include "rigidity/geodesic.hpp"
#include "rigidity/isometry.hpp"
#include "rigidity/json_io.hpp"
#include "rigidity/lemma41.hpp"
#include "rigidity/predicates.hpp"
#include "rigidity/quadrature.hpp"
#include "rigidity/svg.hpp"
#include "rigidity/tolerances.hpp"
#include "rigidity/validate.hpp"
#include "rigidity/vec2.hpp"
