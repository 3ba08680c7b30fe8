from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

sources = [
    "python/module.cpp",
    "src/domain.cpp",
    "src/engine.cpp",
    "src/fdm.cpp",
    "src/heat_potentials.cpp",
    "src/mcs2d.cpp",
    "src/minpdf.cpp",
    "src/vanilla_analytic.cpp",
    "src/variance_paths.cpp",
    "src/willard.cpp",
]

setup(
    ext_modules=[
        Pybind11Extension(
            "svbarrier",
            sources,
            include_dirs=["include", "vendor"],
            cxx_std=20,
            define_macros=[("SVBARRIER_VERSION", '"0.1.0"')],
            extra_compile_args=["-pthread"],
            extra_link_args=["-pthread"],
        )
    ],
    cmdclass={"build_ext": build_ext},
)
