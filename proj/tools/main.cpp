#include "clband/cli.hpp"

int main(int argc, char** argv) { return clband::dispatch(argc, argv); }
