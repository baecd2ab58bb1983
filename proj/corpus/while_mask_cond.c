int main(void) {
  int x = __VERIFIER_nondet_int();
  int n = 0;
  assume(x >= 0 && x < 65536);
  while ((x & 255) != 0) {
    x = x - 1;
    n++;
  }
  return 0;
}
