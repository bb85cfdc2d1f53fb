// Copyright 2026 The spanlift Authors
// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header: pulls in the whole library.

#pragma once

#define SPANLIFT_VERSION "0.1.0"

#include "spanlift/accountant.hpp"
#include "spanlift/density.hpp"
#include "spanlift/dist.hpp"
#include "spanlift/divergences.hpp"
#include "spanlift/entails.hpp"
#include "spanlift/error.hpp"
#include "spanlift/interp.hpp"
#include "spanlift/json_io.hpp"
#include "spanlift/lang.hpp"
#include "spanlift/logic.hpp"
#include "spanlift/numerics.hpp"
#include "spanlift/rational.hpp"
