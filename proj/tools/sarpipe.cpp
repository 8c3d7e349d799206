#include <cstdio>
int main(){ std::puts("sarpipe placeholder"); return 0; }
