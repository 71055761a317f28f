const lib0 = require('render-step-0');
const lib1 = require('render-step-1');
const lib2 = require('render-step-2');
const lib3 = require('render-step-3');
const lib4 = require('render-step-4');
const raw = location.hash;
const v0 = lib0.step(raw);
const v1 = lib1.step(v0);
const v2 = lib2.step(v1);
const v3 = lib3.step(v2);
const v4 = lib4.step(v3);
document.write(v4);
const off0 = lib0.tint('x0');
const off1 = lib1.mark('x1');
const off2 = lib2.pad('x2');
const off3 = lib3.pad('x3');
const off4 = lib4.mark('x4');
const off5 = lib0.tint('x5');
const off6 = lib1.mark('x6');
const off7 = lib2.tint('x7');
const off8 = lib3.mark('x8');
const off9 = lib4.pad('x9');
const off10 = lib0.pad('x10');
const off11 = lib1.tint('x11');
const off12 = lib2.pad('x12');
const off13 = lib3.mark('x13');
const off14 = lib4.tint('x14');
const off15 = lib0.pad('x15');
const off16 = lib1.wrap('x16');
const off17 = lib2.tint('x17');
const off18 = lib3.wrap('x18');
const off19 = lib4.pad('x19');
