// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include "gadget/adversary.hpp"
#include "gadget/broadcast.hpp"
#include "gadget/checkers.hpp"
#include "gadget/config.hpp"
#include "gadget/core.hpp"
#include "gadget/crypto.hpp"
#include "gadget/freezing.hpp"
#include "gadget/internal.hpp"
#include "gadget/messages.hpp"
#include "gadget/netsim.hpp"
#include "gadget/recovery.hpp"
#include "gadget/scripted_oracle.hpp"
#include "gadget/simple_sync.hpp"
#include "gadget/simulator.hpp"
#include "gadget/suite.hpp"
#include "gadget/trace.hpp"
