#pragma once

#include "dulac/scalar.hpp"
#include "dulac/errors.hpp"
#include "dulac/poly.hpp"
#include "dulac/polexp.hpp"
#include "dulac/transseries.hpp"
#include "dulac/derivations.hpp"
#include "dulac/diffeo.hpp"
#include "dulac/rigidity.hpp"
#include "dulac/ode.hpp"
#include "dulac/saddlenum.hpp"
#include "dulac/loopclass.hpp"
#include "dulac/io.hpp"
#include "dulac/random.hpp"
