int main(void) {
  int a = __VERIFIER_nondet_int();
  int b = __VERIFIER_nondet_int();
  int d;
  assume(a >= 0 && b < 0);
  d = a ^ b;
  assert(d < 0);
  if ((a ^ b) < 0) {
    a = 0;
  }
  return 0;
}
