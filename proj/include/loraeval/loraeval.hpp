#ifndef LORAEVAL_LORAEVAL_HPP
#define LORAEVAL_LORAEVAL_HPP

#include "loraeval/adr.hpp"
#include "loraeval/analytics.hpp"
#include "loraeval/error.hpp"
#include "loraeval/io.hpp"
#include "loraeval/network.hpp"
#include "loraeval/oracle.hpp"
#include "loraeval/radio.hpp"
#include "loraeval/random.hpp"
#include "loraeval/sampling.hpp"

#endif
