#pragma once

#define FRZ_VERSION "1.0.0"
