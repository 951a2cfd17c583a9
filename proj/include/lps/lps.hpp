#ifndef LPS_LPS_HPP
#define LPS_LPS_HPP

#include "lps/matrix.hpp"
#include "lps/linalg.hpp"
#include "lps/constructions.hpp"
#include "lps/rigidity.hpp"
#include "lps/trace.hpp"
#include "lps/rpca.hpp"
#include "lps/completion.hpp"
#include "lps/diagnostics.hpp"
#include "lps/repro.hpp"

#endif
