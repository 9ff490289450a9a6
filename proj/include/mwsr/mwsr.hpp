// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mwsr/hermitian.hpp"
#include "mwsr/channel.hpp"
#include "mwsr/projection.hpp"
#include "mwsr/cgp.hpp"
#include "mwsr/instance_io.hpp"
#include "mwsr/trace_csv.hpp"
#include "mwsr/harness.hpp"
