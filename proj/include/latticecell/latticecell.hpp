#pragma once

#include "casi.hpp"
#include "classifier.hpp"
#include "common.hpp"
#include "compiler.hpp"
#include "context.hpp"
#include "evaluation.hpp"
#include "lattice.hpp"
#include "text.hpp"
