#include <pybind11/pybind11.h>
PYBIND11_MODULE(_hardymean, m) { m.doc() = "placeholder"; }
