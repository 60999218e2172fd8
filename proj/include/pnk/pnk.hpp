#pragma once

// Umbrella header for the whole library.

#include "pnk/analysis.hpp"
#include "pnk/ast.hpp"
#include "pnk/desugar.hpp"
#include "pnk/dist.hpp"
#include "pnk/io.hpp"
#include "pnk/kernel.hpp"
#include "pnk/linalg.hpp"
#include "pnk/packet.hpp"
#include "pnk/predicate.hpp"
#include "pnk/sampler.hpp"
#include "pnk/scalar.hpp"
#include "pnk/star.hpp"
#include "pnk/syntax.hpp"
#include "pnk/netlib/f10.hpp"
#include "pnk/netlib/failure.hpp"
#include "pnk/netlib/fattree.hpp"
#include "pnk/netlib/topology.hpp"
#include "pnk/netlib/toy.hpp"
