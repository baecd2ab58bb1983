int main(void) {
  int x = __VERIFIER_nondet_int();
  int low;
  int neg;
  assume(x > 0);
  neg = -x;
  low = x & neg;
  assert(low > 0);
  return 0;
}
