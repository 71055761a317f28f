function emphasistj1(token) {
  const text = token.text;
  return `<em>${text}</em>`;
}
function strongtj1(token) {
  const text = token.text;
  return `<strong>${text}</strong>`;
}
const htmlify = { emphasis: emphasistj1, strong: strongtj1 };
function render(token) {
  const fn = htmlify[token.name];
  return fn(token);
}
module.exports = render;
