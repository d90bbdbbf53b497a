#include "xxz/cli.hpp"

int main(int argc, char** argv)
{
    return xxz::cli_main(argc, argv);
}
