#pragma once

#include "ddd/errors.hpp"
#include "ddd/excitation.hpp"
#include "ddd/gain_estimator.hpp"
#include "ddd/io.hpp"
#include "ddd/linalg.hpp"
#include "ddd/lti.hpp"
#include "ddd/msd.hpp"
#include "ddd/oracle.hpp"
#include "ddd/supply_rate.hpp"
#include "ddd/trajectory.hpp"
#include "ddd/verifier.hpp"
