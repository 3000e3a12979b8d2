#pragma once

#include "pathrep/matcore.hpp"
#include "pathrep/connection.hpp"
#include "pathrep/path.hpp"
#include "pathrep/transport.hpp"
#include "pathrep/reconstruct.hpp"
#include "pathrep/descent.hpp"
#include "pathrep/bordism.hpp"
