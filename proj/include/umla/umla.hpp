#ifndef UMLA_UMLA_HPP
#define UMLA_UMLA_HPP

#include "cexp.hpp"
#include "distribution.hpp"
#include "fibers.hpp"
#include "localfield.hpp"
#include "maps.hpp"
#include "microlocal.hpp"
#include "phase.hpp"
#include "poly.hpp"
#include "schwartz.hpp"

#endif
