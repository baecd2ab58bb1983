int main(void) {
  int a;
  int x = __VERIFIER_nondet_int();
  a = __VERIFIER_nondet_int();
  assume(a > 0);
  assume(a < 4096);
  while (x > 0) {
    a--;
    x = x & a;
  }
  return 0;
}
