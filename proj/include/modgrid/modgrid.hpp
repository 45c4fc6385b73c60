#pragma once

#include "modgrid/assisted.hpp"
#include "modgrid/automatic.hpp"
#include "modgrid/composition.hpp"
#include "modgrid/config.hpp"
#include "modgrid/error.hpp"
#include "modgrid/exporter.hpp"
#include "modgrid/geometry.hpp"
#include "modgrid/image.hpp"
#include "modgrid/image_io.hpp"
#include "modgrid/palette.hpp"
#include "modgrid/random.hpp"
#include "modgrid/svg_reader.hpp"
