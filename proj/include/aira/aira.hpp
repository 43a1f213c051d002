#ifndef AIRA_AIRA_HPP
#define AIRA_AIRA_HPP

// Umbrella header for the numerical library. The HTTP layer lives in
// aira/service.hpp and additionally needs cpp-httplib.

#include "aira/advice.hpp"
#include "aira/bootstrap.hpp"
#include "aira/dataset.hpp"
#include "aira/errors.hpp"
#include "aira/fit.hpp"
#include "aira/irf.hpp"
#include "aira/model.hpp"
#include "aira/model_io.hpp"
#include "aira/report.hpp"
#include "aira/stability.hpp"
#include "aira/vma.hpp"

#endif // AIRA_AIRA_HPP
