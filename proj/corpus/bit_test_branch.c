int main(void) {
  int x = __VERIFIER_nondet_int();
  int y = 0;
  int i = 0;
  assume(x >= 0);
  while (i < 31) {
    if ((x & 1) != 0) {
      y = y + 1;
    }
    x = x >> 1;
    i++;
  }
  return 0;
}
