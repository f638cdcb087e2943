#pragma once

#define MINIMAX_VERSION_MAJOR 0
#define MINIMAX_VERSION_MINOR 1
#define MINIMAX_VERSION_PATCH 0
#define MINIMAX_VERSION_STRING "0.1.0"
