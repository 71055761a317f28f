function dangeroustj1(cmd) {
  eval(cmd);
  return 0;
}
const actionstj1 = { danger: dangeroustj1 };
const picktj1 = 'danger';
const payloadtj1 = location.hash;
actionstj1[picktj1](payloadtj1);
