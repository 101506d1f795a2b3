int k;
double a, b, c;
int main() {
  k++;
  b = a*c-b;
  a = 1.0;
  return 0;
}
