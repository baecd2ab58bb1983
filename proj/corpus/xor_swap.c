int main(void) {
  int a = __VERIFIER_nondet_int();
  int b = __VERIFIER_nondet_int();
  int a0 = a;
  int b0 = b;
  a = a ^ b;
  b = a ^ b;
  a = a ^ b;
  assert(a == b0 && b == a0);
  return 0;
}
