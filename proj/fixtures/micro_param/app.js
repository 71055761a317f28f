function deliver(input) {
  const shaped = external(input);
  const page = `<div>${shaped}</div>`;
  return page;
}
module.exports = deliver;
