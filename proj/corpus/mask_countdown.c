int main(void) {
  int x = __VERIFIER_nondet_int();
  int mask = 255;
  assume(x > 0 && x < 100000);
  while (x > 0) {
    x = x - 1;
    x = x & mask;
  }
  return 0;
}
