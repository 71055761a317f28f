function runWorkertj1(cb) {
  const data = location.hash;
  cb(data);
  return 0;
}
function handlertj1(payload) {
  eval(payload);
  return 0;
}
runWorkertj1(handlertj1);
