#pragma once

#include "marked/algebra.hpp"
#include "marked/ball.hpp"
#include "marked/basis_certify.hpp"
#include "marked/cogrowth.hpp"
#include "marked/coset_engine.hpp"
#include "marked/criteria.hpp"
#include "marked/errors.hpp"
#include "marked/experiments.hpp"
#include "marked/free_engine.hpp"
#include "marked/free_product_engine.hpp"
#include "marked/group.hpp"
#include "marked/group_io.hpp"
#include "marked/hn_engine.hpp"
#include "marked/hn_limit.hpp"
#include "marked/lamplighter_engine.hpp"
#include "marked/metabelian_engine.hpp"
#include "marked/rational.hpp"
#include "marked/report.hpp"
#include "marked/spectral.hpp"
#include "marked/words.hpp"
