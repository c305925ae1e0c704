#pragma once

#include "sandpile/analysis.hpp"
#include "sandpile/configuration.hpp"
#include "sandpile/errors.hpp"
#include "sandpile/fastfix.hpp"
#include "sandpile/harness.hpp"
#include "sandpile/intmath.hpp"
#include "sandpile/model.hpp"
