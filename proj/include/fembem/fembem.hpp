#pragma once

#include "fembem/bessel.hpp"
#include "fembem/config.hpp"
#include "fembem/coupling.hpp"
#include "fembem/curve.hpp"
#include "fembem/errors.hpp"
#include "fembem/fem.hpp"
#include "fembem/gmres.hpp"
#include "fembem/incident.hpp"
#include "fembem/lagrange.hpp"
#include "fembem/mesh.hpp"
#include "fembem/nystrom.hpp"
#include "fembem/oracles.hpp"
#include "fembem/quadrature.hpp"
#include "fembem/refractive.hpp"
#include "fembem/runner.hpp"
