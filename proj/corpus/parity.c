int main(void) {
  int x = __VERIFIER_nondet_int();
  int p = 0;
  int b;
  assume(x >= 0);
  while (x > 0) {
    b = x & 1;
    p = p ^ b;
    x = x >> 1;
  }
  assert(p == 0 || p == 1);
  return 0;
}
