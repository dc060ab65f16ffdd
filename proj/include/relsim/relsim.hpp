#pragma once

#include "relsim/bisim.hpp"
#include "relsim/bitrow.hpp"
#include "relsim/coalgebra.hpp"
#include "relsim/errors.hpp"
#include "relsim/finrel.hpp"
#include "relsim/finrel_io.hpp"
#include "relsim/finset.hpp"
#include "relsim/functor.hpp"
#include "relsim/functor_io.hpp"
#include "relsim/functor_props.hpp"
#include "relsim/lts.hpp"
#include "relsim/monoid.hpp"
#include "relsim/nle.hpp"
#include "relsim/relator.hpp"
#include "relsim/relator_laws.hpp"
#include "relsim/relator_parse.hpp"
#include "relsim/reports.hpp"
#include "relsim/submonoid.hpp"
