#include "itep/cli.hpp"

int main(int argc, char** argv)
{
    return itep::cli::main(argc, argv);
}
