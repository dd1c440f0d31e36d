#pragma once

#include "evm/assignment.hpp"
#include "evm/block.hpp"
#include "evm/common.hpp"
#include "evm/dataset.hpp"
#include "evm/em.hpp"
#include "evm/generators.hpp"
#include "evm/log_binom.hpp"
#include "evm/mevm.hpp"
#include "evm/partition.hpp"
#include "evm/statistics.hpp"
#include "evm/structure.hpp"
#include "evm/welch.hpp"
