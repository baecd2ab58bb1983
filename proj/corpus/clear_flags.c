int main(void) {
  int flags = __VERIFIER_nondet_int();
  int mask = __VERIFIER_nondet_int();
  int nm;
  int out;
  assume(mask >= 0 && mask < 256);
  nm = ~mask;
  out = flags & nm;
  return 0;
}
