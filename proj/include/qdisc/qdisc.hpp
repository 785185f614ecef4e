#pragma once

#include "qdisc/error.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/problem.hpp"
#include "qdisc/modified.hpp"
#include "qdisc/dual.hpp"
#include "qdisc/minerr.hpp"
#include "qdisc/gsolver.hpp"
#include "qdisc/certify.hpp"
#include "qdisc/bench.hpp"
#include "qdisc/io.hpp"
