from setuptools import setup

from MagnonFisher import get_version

try:
    install_requires = [i.strip() for i in open("requirements.txt").readlines()]
except FileNotFoundError:
    print("requirements.txt not found, please run script gen_req_txt for generate requirements.txt file")
    exit(1)

version = get_version("./pyproject.toml")

setup(
    name="magnon-fisher",
    version=version,
    description="Quantum and classical Fisher information for sensing the photon-magnon coupling",
    long_description=open("README.md", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    author="lexxai",
    author_email="lexxai@gmail.com",
    license="MIT",
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    packages=["MagnonFisher"],
    include_package_data=True,
    install_requires=install_requires,
    setup_requires="setuptools",
    python_requires=">=3.11",
    entry_points={"console_scripts": ["magnon-fisher=MagnonFisher.main:entry_point"]},
)
