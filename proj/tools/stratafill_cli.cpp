#include <cstdio>
int main() { std::puts("stratafill cli placeholder"); return 0; }
