#pragma once

#include "spinlab/errors.hpp"
#include "spinlab/exact.hpp"
#include "spinlab/gadgets.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/io.hpp"
#include "spinlab/log_value.hpp"
#include "spinlab/moments.hpp"
#include "spinlab/network.hpp"
#include "spinlab/params.hpp"
#include "spinlab/reductions.hpp"
#include "spinlab/tree.hpp"
