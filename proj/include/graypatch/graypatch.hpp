#pragma once

#include "graypatch/codec.hpp"
#include "graypatch/color.hpp"
#include "graypatch/dataset.hpp"
#include "graypatch/defense.hpp"
#include "graypatch/filter.hpp"
#include "graypatch/image.hpp"
#include "graypatch/manifest.hpp"
#include "graypatch/pipeline.hpp"
#include "graypatch/random.hpp"
#include "graypatch/record.hpp"
#include "graypatch/resize.hpp"
#include "graypatch/transforms.hpp"
