#ifndef FDLINK_FDLINK_HPP
#define FDLINK_FDLINK_HPP

#include "fdlink/channel.hpp"
#include "fdlink/constants.hpp"
#include "fdlink/coupling.hpp"
#include "fdlink/errors.hpp"
#include "fdlink/geometry.hpp"
#include "fdlink/linkbudget.hpp"
#include "fdlink/partition_search.hpp"
#include "fdlink/pattern.hpp"
#include "fdlink/pattern_io.hpp"
#include "fdlink/precoder.hpp"
#include "fdlink/random.hpp"
#include "fdlink/report.hpp"
#include "fdlink/run.hpp"
#include "fdlink/scenario.hpp"
#include "fdlink/touchstone.hpp"

//! fdlink: a link-level simulator for full-duplex massive-MIMO base
//! stations. Channels come from element radiation patterns, the
//! self-interference channel from measured or synthetic S-parameters, and
//! SVD-based antenna partitioning suppresses the coupling between the
//! transmit and receive sides of the array.
namespace fdlink {}

#endif
