#pragma once

// Single include point for cpp-httplib so every translation unit compiles it
// with the same feature set; mixing SSL and non-SSL builds of the header in
// one binary breaks its ABI.
#ifdef CAUSEVAL_WITH_TLS
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#endif
#include <httplib.h>
