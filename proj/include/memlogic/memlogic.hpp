#pragma once

#include "memlogic/device.hpp"
#include "memlogic/engine.hpp"
#include "memlogic/error.hpp"
#include "memlogic/gates.hpp"
#include "memlogic/harness.hpp"
#include "memlogic/io.hpp"
#include "memlogic/netlist.hpp"
