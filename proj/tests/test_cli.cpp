#include <cstdio>
int main() { std::puts("test_cli: not implemented yet"); return 1; }
